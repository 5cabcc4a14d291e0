int countChar(const char *s, char c) {
    int hits=0;
    for (int i = 0; s[i] != '\0'; i++) {
        if (s[i]==c && c != '\0')
            hits++;
    }
    return hits;
}
