static int alternatingSum(int[] xs) {
    int acc = 0;
    int sign = 1;
    for (int i = 0; i < xs.length; i++) {
        acc += sign*xs[i];
        sign=-sign;
    }
    return acc;
}
