bool isPalindrome(const std::string& s) {
    if (s.empty())
        return true;
    int i = 0, j = (int)s.size()-1;
    while (i < j) {
        if (s[i] != s[j]) {
            return false;
        }
        i++;
        j--;
    }
    return true;
}
