int main(void) {
    int xs[] = {3, 9, -1, 9, 4};
    int ys[] = {-5, -2, -8};
    return FN(xs, 5) == 9 && FN(ys, 3) == -2 ? 0 : 1;
}
