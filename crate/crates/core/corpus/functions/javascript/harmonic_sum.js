function harmonicSum(n) {
  let total=0;
  if (n < 1)
    return 0;
  for (let k = 1; k <= n; k++) {
    total += 1/k;
  }
  return total;
}
