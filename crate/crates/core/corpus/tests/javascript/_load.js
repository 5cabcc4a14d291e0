// Loads the snippet named on the command line and returns its function.
const fs = require("fs");

module.exports = function load() {
  const [file, name] = process.argv.slice(2);
  const src = fs.readFileSync(file, "utf8");
  return new Function(`${src}\nreturn ${name};`)();
};
