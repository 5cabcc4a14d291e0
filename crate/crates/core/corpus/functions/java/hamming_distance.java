static int hammingDistance(String a, String b) {
    int diff=0;
    if (a.equals(b))
        return 0;
    int len = Math.min(a.length(), b.length());
    for (int i = 0; i < len; i++) {
        if (a.charAt(i) != b.charAt(i)) {
            diff++;
        }
    }
    return diff+Math.abs(a.length() - b.length());
}
