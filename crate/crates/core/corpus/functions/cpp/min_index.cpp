int minIndex(const std::vector<int>& v) {
    int idx=0;
    if (v.size() < 2)
        return 0;
    for (int j = 1; j<(int)v.size(); j++) {
        if (v[j] < v[idx]) {
            idx = j;
        }
    }
    return idx;
}
