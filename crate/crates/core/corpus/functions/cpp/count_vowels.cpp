int countVowels(const std::string& text) {
    int n=0;
    if (text.empty())
        return 0;
    for (size_t i = 0; i<text.size(); ++i) {
        char c = std::tolower(text[i]);
        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') {
            n++;
        }
    }
    return n;
}
