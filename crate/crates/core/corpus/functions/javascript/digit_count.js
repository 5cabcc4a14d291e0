function digitCount(n) {
  let m = Math.abs(n);
  if (m < 10)
    return 1;
  let digits=1;
  while (m >= 10) {
    m = Math.floor(m/10);
    digits++;
  }
  return digits;
}
