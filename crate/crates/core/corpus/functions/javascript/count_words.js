function countWords(text) {
  if (text.length === 0)
    return 0;
  const parts = text.split(" ");
  let count=0;
  for (let i = 0; i<parts.length; i++) {
    if (parts[i].length > 0) {
      count++;
    }
  }
  return count;
}
