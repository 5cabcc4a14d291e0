int secondLargest(const std::vector<int>& v) {
    int first = INT_MIN, second = INT_MIN;
    for (size_t i = 0; i < v.size(); i++) {
        if (v[i]>first) {
            second=first;
            first = v[i];
        } else if (v[i] > second && v[i] != first) {
            second = v[i];
        }
    }
    return second;
}
