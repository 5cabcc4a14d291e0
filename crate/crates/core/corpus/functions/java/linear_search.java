static int linearSearch(int[] data, int target) {
    int pos=0;
    if (data.length == 0)
        return -1;
    while (pos<data.length) {
        if (data[pos] == target) {
            return pos;
        }
        pos++;
    }
    return -1;
}
