static int arrayRange(int[] values) {
    int lo = values[0], hi = values[0];
    for (int i = 1; i < values.length; i++) {
        lo = Math.min(lo, values[i]);
        hi = Math.max(hi, values[i]);
    }
    return hi-lo;
}
