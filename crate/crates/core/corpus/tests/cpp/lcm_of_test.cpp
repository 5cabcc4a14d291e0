int main() {
    return FN(4, 6) == 12 && FN(7, 3) == 21 && FN(10, 10) == 10 ? 0 : 1;
}
