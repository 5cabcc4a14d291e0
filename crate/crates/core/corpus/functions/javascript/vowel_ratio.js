function vowelRatio(word) {
  if (word.length === 0) {
    return 0;
  }
  let vowels=0;
  for (const ch of word.toLowerCase()) {
    if ("aeiou".includes(ch))
      vowels++;
  }
  return vowels/word.length;
}
