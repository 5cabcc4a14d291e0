int main(void) {
    int xs[] = {1, 2, 4, 7, 10, -6};
    return FN(xs, 6) == 4 && FN(xs, 1) == 0 ? 0 : 1;
}
