long digitReverse(long n) {
    long out=0;
    if (n <= 0)
        return 0;
    while (n > 0) {
        out = out*10 + n%10;
        n = n/10;
    }
    return out;
}
