static int evenOddDiff(int[] nums) {
    int evens = 0;
    int odds = 0;
    for (int v : nums) {
        if (v%2 == 0 && v != 0)
            evens++;
        else
            odds++;
    }
    return evens-odds;
}
