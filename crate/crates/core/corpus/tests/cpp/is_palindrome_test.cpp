int main() {
    return FN("racecar") && FN("") && FN("abba") && !FN("abca") ? 0 : 1;
}
