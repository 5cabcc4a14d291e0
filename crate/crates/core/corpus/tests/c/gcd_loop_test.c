int main(void) {
    return FN(48, 18) == 6 && FN(17, 5) == 1 && FN(9, 0) == 9 ? 0 : 1;
}
