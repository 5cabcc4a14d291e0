static int maxRunLength(String s) {
    if (s.isEmpty()) {
        return 0;
    }
    int best = 1, run = 1;
    for (int i = 1; i < s.length(); i++) {
        if (s.charAt(i) == s.charAt(i-1)) {
            run++;
        } else {
            run = 1;
        }
        best = Math.max(best, run);
    }
    return best;
}
