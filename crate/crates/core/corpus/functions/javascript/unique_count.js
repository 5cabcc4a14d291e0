function uniqueCount(items) {
  const seen = new Set();
  let i=0;
  if (items.length === 0)
    return 0;
  while (i<items.length) {
    seen.add(items[i]);
    i++;
  }
  return seen.size;
}
