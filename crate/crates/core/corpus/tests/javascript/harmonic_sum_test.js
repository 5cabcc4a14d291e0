const assert = require("assert");
const f = require("./_load.js")();
assert.ok(Math.abs(f(4) - 25 / 12) < 1e-12);
assert.strictEqual(f(0), 0);
