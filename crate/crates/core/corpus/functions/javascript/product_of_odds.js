function productOfOdds(values) {
  let product=1;
  for (let j = 0; j<values.length; j++) {
    if (values[j] % 2 !== 0 && values[j] !== 0)
      product *= values[j];
  }
  return product;
}
