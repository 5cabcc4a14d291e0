int main() {
    return FN(1) == 0 && FN(6) == 8 && FN(27) == 111 ? 0 : 1;
}
