const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f(10, 3), 4);
assert.strictEqual(f(9, 3), 3);
assert.strictEqual(f(5, 0), 0);
