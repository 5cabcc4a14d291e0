int main() {
    return FN({3, 2, 1}) == 3 && FN({1, 2, 3}) == 0 && FN({2, 1, 3}) == 1 ? 0 : 1;
}
