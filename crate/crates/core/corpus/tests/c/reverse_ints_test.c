int main(void) {
    int xs[] = {1, 2, 3, 4, 5};
    FN(xs, 5);
    for (int i = 0; i < 5; i++) if (xs[i] != 5 - i) return 1;
    int ys[] = {7, 8};
    FN(ys, 2);
    return ys[0] == 8 && ys[1] == 7 ? 0 : 1;
}
