int main(void) {
    return FN(0) == 1 && FN(5) == 120 && FN(10) == 3628800L ? 0 : 1;
}
