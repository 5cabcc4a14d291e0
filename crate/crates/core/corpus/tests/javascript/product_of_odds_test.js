const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f([1, 2, 3, 4, 5]), 15);
assert.strictEqual(f([2, 4]), 1);
