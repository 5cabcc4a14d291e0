long powerMod(long base, long exp, long mod) {
    long result = 1;
    if (mod == 1)
        return 0;
    base = base%mod;
    while (exp > 0) {
        if (exp%2 == 1) {
            result=(result*base)%mod;
        }
        base = (base*base)%mod;
        exp = exp/2;
    }
    return result;
}
