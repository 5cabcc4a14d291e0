int main(void) {
    return FN(0) == 0 && FN(1) == 1 && FN(10) == 55 && FN(30) == 832040L ? 0 : 1;
}
