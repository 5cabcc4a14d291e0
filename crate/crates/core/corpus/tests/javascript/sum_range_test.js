const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f(1, 10), 55);
assert.strictEqual(f(5, 4), 0);
