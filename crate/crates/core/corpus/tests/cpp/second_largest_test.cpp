int main() {
    return FN({5, 1, 9, 7}) == 7 && FN({2, 2, 1}) == 1 ? 0 : 1;
}
