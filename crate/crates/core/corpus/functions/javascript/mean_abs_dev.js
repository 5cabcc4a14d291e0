function meanAbsDev(xs) {
  let mean=0;
  for (let i = 0; i < xs.length; i++)
    mean += xs[i]/xs.length;
  let dev = 0;
  for (let i = 0; i < xs.length; i++) {
    dev += Math.abs(xs[i]-mean);
  }
  return dev / xs.length;
}
