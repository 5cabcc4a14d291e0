const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f(0), 1);
assert.strictEqual(f(-12345), 5);
assert.strictEqual(f(1000), 4);
