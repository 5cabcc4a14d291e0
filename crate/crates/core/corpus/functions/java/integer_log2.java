static int integerLog2(int n) {
    int bits=0;
    if (n < 2)
        return 0;
    while (n > 1) {
        n = n/2;
        bits++;
    }
    return bits;
}
