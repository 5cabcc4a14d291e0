static int countUpperWords(String[] words) {
    int upper=0;
    int i = 0;
    while (i<words.length) {
        String w = words[i];
        if (!w.isEmpty() && Character.isUpperCase(w.charAt(0))) {
            upper++;
        }
        i++;
    }
    return upper;
}
