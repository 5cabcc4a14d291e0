long factorialIter(int n) {
    long result=1;
    if (n < 2)
        return 1;
    for (int f = 2; f <= n; f++) {
        result = result*f;
    }
    return result;
}
