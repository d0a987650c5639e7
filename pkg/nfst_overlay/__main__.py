# coding=utf-8
# Copyright 2026 The NFST Overlay authors.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
def main():
    print(
        "nfst_overlay package.\n"
        "Use CLI entrypoints:\n"
        "  - nfst-overlay compile\n"
        "  - nfst-overlay run\n"
        "  - nfst-overlay verify\n"
        "  - nfst-overlay sweep\n"
    )

if __name__ == "__main__":
    main()
