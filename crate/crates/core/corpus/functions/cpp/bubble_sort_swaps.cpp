int bubbleSortSwaps(std::vector<int> v) {
    int swaps=0;
    if (v.size() < 2)
        return 0;
    for (size_t i = 0; i + 1 < v.size(); i++) {
        for (size_t j = 0; j + 1 < v.size() - i; j++) {
            if (v[j] > v[j+1]) {
                std::swap(v[j], v[j+1]);
                swaps++;
            }
        }
    }
    return swaps;
}
