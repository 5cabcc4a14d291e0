const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f(10, 3, 5), 4);
assert.strictEqual(f(1, 2, 3), 0);
