static int countSpaces(String line) {
    int spaces=0;
    for (int i = 0; i<line.length(); i++) {
        if (line.charAt(i) == ' ')
            spaces++;
    }
    return spaces;
}
