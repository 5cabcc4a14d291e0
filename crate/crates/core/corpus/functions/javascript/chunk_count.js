function chunkCount(length, size) {
  if (size <= 0) {
    return 0;
  }
  let chunks = 0, pos = 0;
  while (pos<length) {
    chunks++;
    pos+=size;
  }
  return chunks;
}
