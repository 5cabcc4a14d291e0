int main(void) {
    return FN(2, 10, 1000) == 24 && FN(3, 0, 7) == 1 && FN(7, 13, 11) == 2 ? 0 : 1;
}
