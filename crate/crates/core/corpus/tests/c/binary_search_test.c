int main(void) {
    int xs[] = {1, 3, 5, 7, 9, 11};
    for (int i = 0; i < 6; i++) if (FN(xs, 6, xs[i]) != i) return 1;
    return FN(xs, 6, 4) == -1 && FN(xs, 0, 1) == -1 ? 0 : 1;
}
