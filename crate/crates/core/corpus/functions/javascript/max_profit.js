function maxProfit(prices) {
  let lowest = Infinity, profit = 0;
  for (let i = 0; i < prices.length; i++) {
    lowest = Math.min(lowest, prices[i]);
    profit = Math.max(profit, prices[i]-lowest);
  }
  return profit;
}
