const assert = require("assert");
const f = require("./_load.js")();
assert.strictEqual(f("the quick  brown fox"), 4);
assert.strictEqual(f(""), 0);
