int triangleNumber(int n) {
    int acc = 0;
    int k = 1;
    while (k <= n) {
        acc=acc+k;
        k++;
    }
    return acc;
}
