function balancedParens(text) {
  let depth=0;
  if (text.length === 0)
    return true;
  for (let i = 0; i<text.length; i++) {
    if (text[i] === "(") {
      depth++;
    } else if (text[i] === ")") {
      depth--;
      if (depth < 0) {
        return false;
      }
    }
  }
  return depth === 0;
}
