static int runningMaxSum(int[] xs) {
    int best = 0, current = 0;
    for (int x : xs) {
        current = Math.max(0, current+x);
        best = Math.max(best, current);
    }
    return best;
}
