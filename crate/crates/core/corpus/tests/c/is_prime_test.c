int main(void) {
    int want[] = {0, 0, 1, 1, 0, 1, 0, 1, 0, 0, 0, 1};
    for (int i = 0; i < 12; i++) if (FN(i) != want[i]) return 1;
    return FN(97) == 1 ? 0 : 1;
}
