int main(void) {
    double a[] = {1.0, 2.0, 3.0};
    double b[] = {4.0, -5.0, 6.0};
    return fabs(FN(a, b, 3) - 12.0) < 1e-9 ? 0 : 1;
}
