int countAbove(const std::vector<double>& xs, double limit) {
    int above=0;
    for (double x : xs) {
        if (x>limit)
            above++;
    }
    return above;
}
