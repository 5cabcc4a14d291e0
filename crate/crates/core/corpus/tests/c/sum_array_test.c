int main(void) {
    int xs[] = {3, 4, 5, -2};
    if (FN(xs, 4) != 10) return 1;
    if (FN(xs, 0) != 0) return 1;
    return 0;
}
