int main() {
    std::vector<double> xs{1.0, 2.0, 6.0};
    return std::abs(FN(xs) - 3.0) < 1e-12 && FN({}) == 0.0 ? 0 : 1;
}
