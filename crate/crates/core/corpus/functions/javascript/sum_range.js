function sumRange(lo, hi) {
  let s = 0;
  if (lo > hi)
    return 0;
  let v = lo;
  while (v<=hi) {
    s+=v;
    v++;
  }
  return s;
}
