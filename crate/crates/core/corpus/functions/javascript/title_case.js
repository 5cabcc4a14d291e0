function titleCase(sentence) {
  if (sentence.length === 0)
    return sentence;
  const words = sentence.split(" ");
  for (let i = 0; i < words.length; i++) {
    const w = words[i];
    words[i]=w.charAt(0).toUpperCase()+w.slice(1);
  }
  return words.join(" ");
}
