function countMultiples(limit, a, b) {
  let hits=0;
  if (limit <= 1)
    return 0;
  for (let n = 1; n<limit; n++) {
    if (n % a === 0 || n % b === 0) {
      hits++;
    }
  }
  return hits;
}
