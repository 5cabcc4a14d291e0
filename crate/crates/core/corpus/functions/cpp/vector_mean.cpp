double vectorMean(const std::vector<double>& xs) {
    if (xs.empty())
        return 0.0;
    double sum=0.0;
    for (size_t i = 0; i<xs.size(); i++) {
        sum+=xs[i];
    }
    return sum / xs.size();
}
