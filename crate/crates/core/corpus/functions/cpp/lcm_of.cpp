long lcmOf(long a, long b) {
    long x = a, y = b;
    while (y != 0) {
        long t = x%y;
        x = y;
        y = t;
    }
    long lcm = a/x*b;
    return lcm;
}
